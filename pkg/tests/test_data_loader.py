"""
Tests for CSV ingestion and domain files.
"""
import json

import pytest

from marginal_pgm.core.errors import DatasetError
from marginal_pgm.utils.data_loader import BinningRule, load_dataset, read_domain_file

ADULT_DOMAIN = {
    "age": 85, "workclass": 9, "fnlwgt": 100, "education": 16, "education-num": 16,
    "marital-status": 7, "occupation": 15, "relationship": 6, "race": 5, "sex": 2,
    "capital-gain": 100, "capital-loss": 100, "hours-per-week": 100, "native-country": 42,
    "income": 2,
}
ADULT_BINNING = {
    "age": {"min": 17, "max": 102, "bins": 85},
    "fnlwgt": {"min": 0, "max": 1_500_000, "bins": 100},
    "capital-gain": {"min": 0, "max": 100_000, "bins": 100},
    "capital-loss": {"min": 0, "max": 5_000, "bins": 100},
    "hours-per-week": {"min": 0, "max": 100, "bins": 100},
}


@pytest.fixture
def write(tmp_path):
    def _write(name, content):
        path = tmp_path / name
        path.write_text(content if isinstance(content, str) else json.dumps(content))
        return path
    return _write


def test_categorical_columns_are_coded(write):
    domain = write("domain.json", {"sex": ["f", "m"], "smoker": 2})
    csv = write("data.csv", "sex,smoker,ignored\nf,no,1\nm,yes,2\n")
    data = load_dataset(csv, domain)
    assert data.records.values.tolist() == [[0, 0], [1, 1]]
    assert data.value_maps == {"sex": ["f", "m"], "smoker": ["no", "yes"]}
    assert data.decoded()["smoker"].tolist() == ["no", "yes"]


def test_unseen_codes_keep_numeric_labels(write):
    domain = write("domain.json", {"colour": 3})
    data = load_dataset(write("data.csv", "colour\nred\nred\n"), domain)
    assert data.value_maps["colour"] == ["red", "1", "2"]


def test_numeric_columns_are_binned(write):
    domain = write("domain.json", {"age": 4})
    data = load_dataset(write("data.csv", "age\n25\n0\n99.9\n"), domain,
                        {"age": {"min": 0, "max": 100, "bins": 4}})
    assert data.records["age"].tolist() == [1, 0, 3]
    assert data.value_maps["age"][1] == "[25, 50)"


def test_binning_rule_edges():
    strict = BinningRule(0.0, 10.0, 5)
    assert strict.code(0.0) == 0
    assert strict.code(9.999) == 4
    assert strict.code(10.0) is None
    assert strict.code(-0.1) is None
    loose = BinningRule(0.0, 10.0, 5, strict=False)
    assert loose.code(12.0) == 4
    assert loose.code(-3.0) == 0
    with pytest.raises(DatasetError):
        BinningRule(1.0, 1.0, 3)
    with pytest.raises(DatasetError):
        BinningRule.from_config({"min": 0, "bins": 3})


def test_out_of_range_value_reports_its_line(write):
    domain = write("domain.json", {"age": 4})
    csv = write("data.csv", "age\n10\n20\n100\n")
    with pytest.raises(DatasetError) as info:
        load_dataset(csv, domain, {"age": {"min": 0, "max": 100, "bins": 4}})
    assert info.value.line == 4


def test_non_numeric_value_reports_its_line(write):
    domain = write("domain.json", {"age": 4})
    with pytest.raises(DatasetError) as info:
        load_dataset(write("data.csv", "age\nold\n"), domain, {"age": {"min": 0, "max": 100, "bins": 4}})
    assert info.value.line == 2


def test_unknown_category_reports_its_line(write):
    domain = write("domain.json", {"sex": ["f", "m"]})
    with pytest.raises(DatasetError) as info:
        load_dataset(write("data.csv", "sex\nf\nm\nx\n"), domain)
    assert info.value.line == 4


def test_too_many_distinct_values(write):
    domain = write("domain.json", {"colour": 2})
    with pytest.raises(DatasetError) as info:
        load_dataset(write("data.csv", "colour\nred\nblue\ngreen\n"), domain)
    assert info.value.line == 4


def test_blank_cell_reports_its_line(write):
    domain = write("domain.json", {"sex": ["f", "m"], "smoker": 2})
    with pytest.raises(DatasetError) as info:
        load_dataset(write("data.csv", "sex,smoker\nf,no\nm, \n"), domain)
    assert info.value.line == 3


def test_missing_column_and_files(write, tmp_path):
    domain = write("domain.json", {"sex": 2, "age": 3})
    with pytest.raises(DatasetError):
        load_dataset(write("data.csv", "sex\nf\n"), domain)
    with pytest.raises(DatasetError):
        load_dataset(tmp_path / "absent.csv", domain)
    with pytest.raises(DatasetError):
        load_dataset(write("data.csv", "sex,age\nf,1\n"), domain, {"height": {"min": 0, "max": 1, "bins": 2}})


def test_domain_file_errors(write, tmp_path):
    with pytest.raises(DatasetError):
        read_domain_file(tmp_path / "absent.json")
    with pytest.raises(DatasetError):
        read_domain_file(write("empty.json", {}))
    with pytest.raises(DatasetError):
        read_domain_file(write("bad.json", {"age": "many"}))


def test_adult_like_schema(write):
    domain_path = write("adult.json", ADULT_DOMAIN)
    domain, labels = read_domain_file(domain_path)
    assert len(domain) == 15
    assert domain.log10_size() == pytest.approx(19.0, abs=0.1)
    assert domain.size_string().endswith("e19")
    assert all(v is None for v in labels.values())

    header = ",".join(ADULT_DOMAIN)
    rows = [
        "39,State-gov,77516,Bachelors,13,Never-married,Adm-clerical,Not-in-family,"
        "White,Male,2174,0,40,United-States,<=50K",
        "50,Self-emp,83311,Bachelors,13,Married,Exec-managerial,Husband,"
        "White,Male,0,0,13,United-States,>50K",
    ]
    data = load_dataset(write("adult.csv", "\n".join([header] + rows) + "\n"), domain_path, ADULT_BINNING)
    assert len(data) == 2
    assert data.records["age"].tolist() == [22, 33]
    assert data.records["income"].tolist() == [0, 1]
