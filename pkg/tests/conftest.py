import pytest
from fastapi.testclient import TestClient

from irtplace.api import create_app
from irtplace.fixtures import copy_sql_repo
from irtplace.repository import Repository


@pytest.fixture
def repo_dir(tmp_path):
    """Writable copy of the packaged SQL example repository."""
    return copy_sql_repo(tmp_path / "repo")


@pytest.fixture
def repo(repo_dir):
    return Repository.load(repo_dir)


@pytest.fixture
def client(repo_dir, tmp_path):
    app = create_app(repo_dir, event_dir=tmp_path / "events")
    with TestClient(app, raise_server_exceptions=False) as test_client:
        yield test_client
