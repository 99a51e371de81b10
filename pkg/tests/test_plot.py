import xml.etree.ElementTree as ET

import pytest

from fracfbmc.harness import BerRecord
from fracfbmc.plot import group_series, plot_records


def _records():
    out = []
    for scheme in ("frac", "naive_alamouti"):
        for iafo in (0.0, 0.3):
            for snr, err in ((0.0, 1000), (10.0, 100), (20.0, 10), (30.0, 0)):
                out.append(BerRecord(scheme, "flat", snr, iafo, 128, 10, 10_000, err))
    return out


def test_grouping_by_scheme_and_offset():
    series = group_series(_records(), "snr")
    assert len(series) == 4
    for recs in series.values():
        bers = [r.ber for r in recs]
        assert bers == sorted(bers, reverse=True)


def test_grouping_other_axes():
    assert len(group_series(_records(), "iafo")) == 8
    with pytest.raises(ValueError):
        group_series(_records(), "time")


def test_svg_is_valid_and_log_scaled(tmp_path):
    path = tmp_path / "p.svg"
    plot_records(_records(), path, "snr")
    root = ET.parse(path).getroot()
    assert root.tag.endswith("svg")
    text = path.read_text()
    assert "10^{-2}" in text and "10^{-3}" in text  # decade ticks of a log axis
    # no timestamp, so repeated renders are identical
    path2 = tmp_path / "q.svg"
    plot_records(_records(), path2, "snr")
    assert path.read_bytes() == path2.read_bytes()
