import pytest

from netal.experiments import load_prepared, prepare_datasets
from netal.simulate import generate_corpus

from helpers import two_blob_dataset


@pytest.fixture(scope="session")
def small_corpus():
    # 3% scale keeps only the two biggest attacks above the 100-row floor,
    # which is plenty for pipeline tests; full-scale behavior is covered by
    # the acceptance suite
    return generate_corpus(seed=7, scale=0.03, include_rare=True)


@pytest.fixture(scope="session")
def small_data_dir(tmp_path_factory, small_corpus):
    root = tmp_path_factory.mktemp("prepared")
    prepare_datasets(small_corpus, root, split_seed=0)
    return root


@pytest.fixture(scope="session")
def smurf_prepared(small_data_dir):
    return load_prepared(small_data_dir / "smurf")


@pytest.fixture
def blobs():
    return two_blob_dataset()
