"""
File: replay_server.py
A small OpenAI-compatible chat-completions endpoint that answers from
recorded completions (the HBTP_LLM_CACHE directory format), so the live
provider path can run end to end without a model behind it.

  python replay_server.py --cache recorded/ --port 8765
  HBTP_LLM_ENDPOINT=http://127.0.0.1:8765/v1 python main.py plan --provider llm ...
"""

import asyncio
import json
import logging
import os
import threading
import time
from typing import Dict, Optional

import click
from aiohttp import web

from llm_service import prompt_key

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def load_recordings(cache_dir: Optional[str]) -> Dict[str, str]:
    recordings: Dict[str, str] = {}
    if not cache_dir or not os.path.isdir(cache_dir):
        return recordings
    for name in sorted(os.listdir(cache_dir)):
        if not name.endswith(".json"):
            continue
        try:
            with open(os.path.join(cache_dir, name), "r", encoding="utf-8") as file:
                recordings[name[: -len(".json")]] = json.load(file)["completion"]
        except (OSError, ValueError, KeyError) as e:
            logger.error(f"Error loading recording {name}: {str(e)}")
    return recordings


def _completion_body(content: str, model: str) -> Dict:
    return {
        "id": f"replay-{int(time.time() * 1000)}",
        "object": "chat.completion",
        "created": int(time.time()),
        "model": model,
        "choices": [
            {"index": 0, "message": {"role": "assistant", "content": content}, "finish_reason": "stop"}
        ],
        "usage": {"prompt_tokens": 0, "completion_tokens": 0, "total_tokens": 0},
    }


def create_app(recordings: Dict[str, str]) -> web.Application:
    """Keys are prompt hashes of the last user message."""

    async def chat_completions(request: web.Request) -> web.Response:
        try:
            body = await request.json()
            messages = body.get("messages", [])
            prompt = next(m["content"] for m in reversed(messages) if m.get("role") == "user")
        except (ValueError, KeyError, StopIteration) as e:
            logger.error(f"Error reading request: {str(e)}")
            return web.json_response({"error": {"message": "malformed request", "type": "invalid_request_error"}}, status=400)

        key = prompt_key(prompt)
        if key not in recordings:
            logger.warning(f"No recording for prompt {key[:12]}")
            return web.json_response(
                {"error": {"message": f"no recording for prompt {key}", "type": "not_found"}}, status=404
            )
        return web.json_response(_completion_body(recordings[key], body.get("model", "replay")))

    app = web.Application()
    app.router.add_post("/v1/chat/completions", chat_completions)
    app.router.add_post("/chat/completions", chat_completions)
    return app


class ReplayServer:
    """Runs the app on its own event loop in a daemon thread."""

    def __init__(self, recordings: Dict[str, str], host: str = "127.0.0.1", port: int = 0):
        self.recordings = recordings
        self.host = host
        self.port = port
        self._loop = asyncio.new_event_loop()
        self._runner: Optional[web.AppRunner] = None
        self._thread = threading.Thread(target=self._loop.run_forever, daemon=True)

    @property
    def endpoint(self) -> str:
        return f"http://{self.host}:{self.port}/v1"

    async def _start(self) -> None:
        self._runner = web.AppRunner(create_app(self.recordings))
        await self._runner.setup()
        site = web.TCPSite(self._runner, self.host, self.port)
        await site.start()
        self.port = self._runner.addresses[0][1]

    def start(self) -> "ReplayServer":
        self._thread.start()
        asyncio.run_coroutine_threadsafe(self._start(), self._loop).result(timeout=10)
        logger.info(f"Replay server listening on {self.endpoint}")
        return self

    def stop(self) -> None:
        if self._runner is not None:
            asyncio.run_coroutine_threadsafe(self._runner.cleanup(), self._loop).result(timeout=10)
        self._loop.call_soon_threadsafe(self._loop.stop)
        self._thread.join(timeout=10)

    def __enter__(self) -> "ReplayServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()


@click.command()
@click.option("--cache", "cache_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8765, show_default=True, type=int)
def main(cache_dir: str, host: str, port: int) -> None:
    recordings = load_recordings(cache_dir)
    logger.info(f"Serving {len(recordings)} recorded completions")
    web.run_app(create_app(recordings), host=host, port=port)


if __name__ == "__main__":
    main()
