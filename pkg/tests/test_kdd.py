import numpy as np
import pytest

from netal.kdd import (
    CATEGORICAL_IDX,
    FEATURE_NAMES,
    N_FEATURES,
    ParseError,
    parse_kdd,
    parse_kdd_file,
)

from helpers import full_line


def test_feature_layout():
    assert N_FEATURES == 41
    assert len(FEATURE_NAMES) == 41
    assert CATEGORICAL_IDX == (1, 2, 3)
    assert FEATURE_NAMES[0] == "duration"
    assert FEATURE_NAMES[4] == "src_bytes"
    assert FEATURE_NAMES[-1] == "dst_host_srv_rerror_rate"


def test_parse_known_record():
    # http request with the classic shape: zero duration, one-digit counts
    line = full_line(
        duration=0, src_bytes=181, dst_bytes=5450, dst_host_srv_count=9
    )
    records = parse_kdd([line])
    assert len(records) == 1
    r = records[0]
    assert r.duration == 0.0
    assert r.protocol_type == "tcp"
    assert r.service == "http"
    assert r.flag == "SF"
    assert r.src_bytes == 181.0
    assert r.dst_bytes == 5450.0
    assert r.land == 0.0
    assert r.wrong_fragment == 0.0
    assert r.urgent == 0.0
    assert r.hot == 0.0
    assert r.dst_host_srv_count == 9.0
    assert r.label == "normal."


def test_parse_multiple_and_column_access():
    lines = [
        full_line(src_bytes=181, dst_bytes=5450, dst_host_srv_count=9),
        full_line(src_bytes=239, dst_bytes=486, dst_host_srv_count=19),
        full_line(src_bytes=235, dst_bytes=1337, dst_host_srv_count=29),
    ]
    records = parse_kdd(lines)
    assert len(records) == 3
    np.testing.assert_array_equal(
        records.continuous_column("src_bytes"), [181.0, 239.0, 235.0]
    )
    np.testing.assert_array_equal(
        records.continuous_column("dst_host_srv_count"), [9.0, 19.0, 29.0]
    )
    np.testing.assert_array_equal(
        records.categorical_column("service"), ["http", "http", "http"]
    )


def test_blank_numeric_field_is_nan():
    line = full_line()
    parts = line.split(",")
    parts[0] = ""  # duration left blank
    records = parse_kdd([",".join(parts)])
    assert np.isnan(records.continuous[0, 0])


def test_parse_errors_carry_line_number():
    good = full_line()
    with pytest.raises(ParseError) as e:
        parse_kdd([good, "tcp,only,three,fields"])
    assert e.value.line_no == 2
    with pytest.raises(ParseError):
        parse_kdd([full_line(duration="notanumber")])


def test_empty_lines_skipped():
    records = parse_kdd([full_line(), "", full_line(label="smurf.")])
    assert len(records) == 2
    assert list(records.labels) == ["normal.", "smurf."]


def test_roundtrip_through_lines():
    lines = [
        full_line(duration=3, src_bytes=42, same_srv_rate=0.33),
        full_line(label="neptune.", count=511),
    ]
    records = parse_kdd(lines)
    back = list(records.to_lines())
    again = parse_kdd(back)
    np.testing.assert_array_equal(records.continuous, again.continuous)
    np.testing.assert_array_equal(records.categorical, again.categorical)
    np.testing.assert_array_equal(records.labels, again.labels)


def test_parse_file(tmp_path):
    p = tmp_path / "three.kdd"
    p.write_text("\n".join([full_line(), full_line(), full_line()]) + "\n")
    assert len(parse_kdd_file(p)) == 3
