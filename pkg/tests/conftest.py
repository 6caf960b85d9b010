import json
from pathlib import Path

import pytest

from mipw import prompting
from mipw.gateway import CompletionRequest, ModelConfig, PlaybackBackend, cache_key

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


def playback_fixtures_for(records, config: ModelConfig, responses_by_id: dict[str, str],
                          template=None) -> dict[str, str]:
    """Key scripted response text by the request digest the gateway will use."""
    template = template or prompting.default_template()
    fixtures = {}
    for record in records:
        instance = prompting.build_messages(template, record.sentence, sentence_id=record.id)
        request = CompletionRequest(messages=instance.messages, config=config)
        fixtures[cache_key(request)] = responses_by_id[record.id]
    return fixtures


@pytest.fixture()
def e2e_corpus_path() -> Path:
    return FIXTURES / "trofi_e2e.txt"


@pytest.fixture()
def e2e_responses() -> dict[str, str]:
    return json.loads((FIXTURES / "e2e_responses.json").read_text(encoding="utf-8"))


@pytest.fixture()
def e2e_config() -> ModelConfig:
    return ModelConfig(model_id="mock-model", top_p=0.1)


@pytest.fixture()
def e2e_backend(e2e_corpus_path, e2e_responses, e2e_config) -> PlaybackBackend:
    from mipw.corpus import load_trofi

    records = load_trofi(e2e_corpus_path)
    return PlaybackBackend(playback_fixtures_for(records, e2e_config, e2e_responses))
