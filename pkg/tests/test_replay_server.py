import pytest

from llm_service import LLMService, ProviderTransportError, prompt_key
from provider_service import LiveLLMProvider
from reasoning_parser import build_prompt
from replay_server import ReplayServer, load_recordings

ANSWER = (
    "Heuristic Path: Walk_apple, Grab_apple, Walk_table, Put_apple_table\n"
    "Relevant Action Predicates: Walk, Grab, Put\n"
    "Relevant Objects: apple, table"
)


def test_live_provider_against_replay_endpoint(kitchen_problem, optimal_kitchen_path):
    prompt = build_prompt(kitchen_problem.domain, kitchen_problem.s0, kitchen_problem.goal)
    with ReplayServer({prompt_key(prompt): ANSWER}) as server:
        service = LLMService(api_key="replay", endpoint=server.endpoint, model="replay")
        result = LiveLLMProvider(service, max_retries=0).reason(kitchen_problem)
        assert result.path == optimal_kitchen_path

        with pytest.raises(ProviderTransportError):
            service.complete("nothing recorded for this prompt")


def test_load_recordings_skips_bad_files(tmp_path):
    (tmp_path / "abc.json").write_text('{"prompt": "p", "completion": "c"}', encoding="utf-8")
    (tmp_path / "broken.json").write_text("{", encoding="utf-8")
    (tmp_path / "notes.txt").write_text("ignored", encoding="utf-8")
    assert load_recordings(str(tmp_path)) == {"abc": "c"}
    assert load_recordings(None) == {}
