import pytest


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path_factory, monkeypatch):
    monkeypatch.setenv("OSPCHAR_CACHE_DIR", str(tmp_path_factory.mktemp("cache")))
