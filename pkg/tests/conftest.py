from __future__ import annotations

import json
from pathlib import Path

import pytest

from spacesteer.compiler import PromptTemplate, load_default_template
from spacesteer.gateway import Gateway, MockProvider
from spacesteer.rubric import Rubric, load_default_rubric
from spacesteer.workspace import (
    Annotation,
    Cluster,
    Connection,
    Document,
    Highlight,
    Ref,
    Workspace,
    deserialize,
)

FIXTURES = Path(__file__).parent / "fixtures"
GOLDENS = FIXTURES / "goldens"


@pytest.fixture(autouse=True)
def offline_env(request, monkeypatch):
    """Keep unit tests off any live endpoint the host environment points at.

    Tests marked ``live`` opt out and see the real environment.
    """
    if request.node.get_closest_marker("live"):
        return
    for name in ("LLM_API_KEY", "LLM_BASE_URL", "LLM_MODEL"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture(scope="session")
def crescent() -> Workspace:
    return deserialize((FIXTURES / "crescent_workspace.json").read_bytes())


@pytest.fixture(scope="session")
def litreview() -> Workspace:
    return deserialize((FIXTURES / "litreview_workspace.json").read_bytes())


@pytest.fixture(scope="session")
def template() -> PromptTemplate:
    return load_default_template()


@pytest.fixture(scope="session")
def rubric() -> Rubric:
    return load_default_rubric()


@pytest.fixture()
def mock_gateway() -> Gateway:
    return Gateway(MockProvider(), sleep=lambda _: None)


def golden_bundle(name: str) -> dict:
    return json.loads((GOLDENS / f"{name}.json").read_text(encoding="utf-8"))


def tiny_workspace() -> Workspace:
    """Small hand-built workspace used across unit tests.

    Two clusters (one named), one unclustered document, two highlight acts on
    the same span, one annotation each on a document and a cluster, and one
    connection of each endpoint kind.
    """
    documents = (
        Document(id="D1", body="alpha beta gamma", title="first"),
        Document(id="D2", body="delta epsilon"),
        Document(id="D3", body="zeta eta theta"),
    )
    highlights = (
        Highlight(doc_id="D1", start=0, end=5, text="alpha"),
        Highlight(doc_id="D1", start=0, end=5, text="alpha"),
        Highlight(doc_id="D2", start=6, end=13, text="epsilon"),
    )
    annotations = (
        Annotation(target="D1", text="watch this one"),
        Annotation(target="C1", text="the whole group matters"),
    )
    clusters = (
        Cluster(id="C1", name="Group One", members=("D1", "D2")),
        Cluster(id="C2", name=None, members=("D3",)),
    )
    connections = (
        Connection(Ref.doc("D1"), Ref.doc("D2"), label="leads to"),
        Connection(Ref.doc("D3"), Ref.cluster("C1"), label=None),
        Connection(Ref.text("alpha"), Ref.text("epsilon"), label="same actor"),
    )
    return Workspace(
        documents=documents,
        relevant=frozenset({"D1", "D2"}),
        highlights=highlights,
        annotations=annotations,
        clusters=clusters,
        connections=connections,
    )
