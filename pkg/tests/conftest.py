import numpy as np
import pytest

from parcelsteer import SynthSpec, extract_supervoxels, generate


@pytest.fixture(scope="session")
def small_spec():
    return SynthSpec(
        dims=(12, 8, 6),
        n_networks=2,
        clusters_per_network=2,
        timepoints=60,
        noise_sd=0.3,
        seed=7,
        svs_per_cluster=3,
    )


@pytest.fixture(scope="session")
def small_dataset(small_spec):
    return generate(small_spec)


@pytest.fixture(scope="session")
def small_svs(small_dataset):
    return extract_supervoxels(
        small_dataset.scan, small_dataset.atlas, small_dataset.meta
    )


@pytest.fixture(scope="session")
def dataset_dir(small_spec, tmp_path_factory):
    from parcelsteer import write_dataset

    out = tmp_path_factory.mktemp("dataset")
    write_dataset(small_spec, out)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
