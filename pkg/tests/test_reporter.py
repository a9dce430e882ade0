# -*- coding: utf-8 -*-
import pandas as pd

from analysis import CorpusSummary
from config import SKIP_COLS
from conftest import make_summary_frame
from reporter import HashtagReporter


def test_artifact_name_with_and_without_location():
    assert HashtagReporter.artifact_name("chain", "tag", "nyc", "sir") == "chain_tag_nyc_sir.csv"
    assert HashtagReporter.artifact_name("trace", "tag", None, "siri") == "trace_tag_siri.csv"
    assert HashtagReporter.artifact_name("chain", "a/b c", "", "sir") == "chain_a_b_c_sir.csv"
    assert HashtagReporter.artifact_name("sweep", "tag", "sf") == "sweep_tag_sf.csv"


def test_write_csv_formats_floats_and_creates_directories(tmp_path):
    path = HashtagReporter.write_csv(pd.DataFrame({"x": [1.0 / 3.0, 2.0]}), tmp_path / "nested" / "out.csv")
    assert path.read_text(encoding="utf-8") == "x\n0.3333333333\n2\n"


def test_skip_report_columns(tmp_path):
    rows = [{"hashtag": "a", "location": "", "model": "sir", "reason": "AllZero: nothing to fit"}]
    path = HashtagReporter.export_skips(rows, tmp_path / "skipped.csv")
    assert path.read_text(encoding="utf-8").splitlines()[0] == ",".join(SKIP_COLS)


def test_text_report_sections():
    summary = CorpusSummary.from_frame(make_summary_frame([0.5, 3.0, 1.5], locations=["", "nyc", ""]))
    report = HashtagReporter.generate_text_report(summary, threshold=1.0, top_n=2)
    assert "HASHTAG INFECTIOUSNESS REPORT (SIR)" in report
    assert "Hashtags fitted:            3" in report
    assert "66.67%" in report
    assert "1. #tag01 @ nyc" in report
    assert "2. #tag02" in report
    assert "#tag00" not in report


def test_siri_report_names_the_decay_rate():
    summary = CorpusSummary.from_frame(make_summary_frame([2.0], model="siri"))
    report = HashtagReporter.generate_text_report(summary)
    assert "Median nu:" in report
