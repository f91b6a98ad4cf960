from __future__ import annotations

import pytest

from triplan import load_dataset

from .fixtures import (
    baltimore_dataset,
    baltimore_query,
    hilton_head_dataset,
    hilton_head_query,
    myrtle_dataset,
    myrtle_query,
)


@pytest.fixture(scope="session")
def myrtle_dir(tmp_path_factory):
    return myrtle_dataset(tmp_path_factory.mktemp("myrtle"))


@pytest.fixture(scope="session")
def myrtle_sb(myrtle_dir):
    return load_dataset(myrtle_dir)


@pytest.fixture()
def myrtle_q():
    return myrtle_query()


@pytest.fixture(scope="session")
def baltimore_dir(tmp_path_factory):
    return baltimore_dataset(tmp_path_factory.mktemp("baltimore"))


@pytest.fixture(scope="session")
def baltimore_sb(baltimore_dir):
    return load_dataset(baltimore_dir)


@pytest.fixture()
def baltimore_q():
    return baltimore_query()


@pytest.fixture(scope="session")
def hilton_dir(tmp_path_factory):
    return hilton_head_dataset(tmp_path_factory.mktemp("hilton"))


@pytest.fixture(scope="session")
def hilton_sb(hilton_dir):
    return load_dataset(hilton_dir)


@pytest.fixture()
def hilton_q():
    return hilton_head_query()
