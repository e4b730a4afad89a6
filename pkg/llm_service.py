"""
File: llm_service.py
Chat-completion access for the live reasoning provider. Wraps a LangChain chat
model, caches completions per prompt, and can replay recorded completions from
a directory so benchmark runs are reproducible offline.
"""

import hashlib
import json
import logging
import os
import re
import threading
from typing import Dict, Optional

import openai
from langchain_core.language_models.chat_models import BaseChatModel
from langchain_core.messages import HumanMessage, SystemMessage
from langchain_openai import ChatOpenAI

from reasoning_parser import ProviderError

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

DEFAULT_MODEL = "gpt-4o"

SYSTEM_MESSAGE = (
    "You are a household robot task planner. Answer with exactly the three labeled lines "
    "the prompt asks for and nothing else."
)


class ProviderTransportError(ProviderError):
    def __init__(self, message: str, kind: str = "transport"):
        self.kind = kind
        super().__init__(message)


def prompt_key(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


def _strip_fences(content: str) -> str:
    m = re.fullmatch(r"```[\w-]*\n(.*?)\n?```", content.strip(), flags=re.DOTALL)
    return m.group(1).strip() if m else content.strip()


class LLMService:
    def __init__(
        self,
        api_key: Optional[str] = None,
        endpoint: Optional[str] = None,
        model: str = DEFAULT_MODEL,
        temperature: float = 0.0,
        cache_dir: Optional[str] = None,
        replay_only: bool = False,
        llm: Optional[BaseChatModel] = None,
    ):
        """A chat model may be passed in directly; otherwise an OpenAI-compatible endpoint is used."""
        if llm is None and not replay_only:
            if not api_key:
                raise ProviderTransportError("No API key configured for the live provider", kind="auth")
            llm = ChatOpenAI(
                model=model,
                temperature=temperature,
                openai_api_key=api_key,
                base_url=endpoint,
                max_tokens=1000,
            )
        self.llm = llm
        self.cache_dir = cache_dir
        self.replay_only = replay_only
        self.calls = 0
        self._cache: Dict[str, str] = {}
        self._lock = threading.Lock()
        if cache_dir:
            os.makedirs(cache_dir, exist_ok=True)

    def _recorded_path(self, key: str) -> Optional[str]:
        return os.path.join(self.cache_dir, f"{key}.json") if self.cache_dir else None

    def _read_recorded(self, key: str) -> Optional[str]:
        path = self._recorded_path(key)
        if path is None or not os.path.exists(path):
            return None
        try:
            with open(path, "r", encoding="utf-8") as file:
                return json.load(file)["completion"]
        except (OSError, ValueError, KeyError) as e:
            logger.error(f"Error reading recorded completion {path}: {str(e)}")
            return None

    def _write_recorded(self, key: str, prompt: str, completion: str) -> None:
        path = self._recorded_path(key)
        if path is None:
            return
        try:
            with open(path, "w", encoding="utf-8") as file:
                json.dump({"prompt": prompt, "completion": completion}, file, ensure_ascii=False, indent=2)
        except OSError as e:
            logger.error(f"Error recording completion {path}: {str(e)}")

    def complete(self, prompt: str) -> str:
        """Completion text for prompt; identical prompts hit the cache."""
        key = prompt_key(prompt)
        with self._lock:
            if key in self._cache:
                return self._cache[key]

        # recorded completions win over a live call
        content = self._read_recorded(key)
        if content is None:
            if self.replay_only:
                raise ProviderTransportError(f"No recorded completion for prompt {key[:12]}")
            content = self._generate_content(prompt)
            self._write_recorded(key, prompt, content)

        with self._lock:
            self._cache[key] = content
        return content

    def _generate_content(self, prompt: str) -> str:
        messages = [SystemMessage(content=SYSTEM_MESSAGE), HumanMessage(content=prompt)]
        try:
            response = self.llm.invoke(messages)
        except openai.AuthenticationError as e:
            logger.error(f"Authentication failed: {str(e)}")
            raise ProviderTransportError(str(e), kind="auth") from e
        except openai.APIError as e:
            logger.error(f"Error generating content: {str(e)}")
            raise ProviderTransportError(str(e)) from e

        with self._lock:
            self.calls += 1
        content = _strip_fences(response.content or "")
        if not content:
            logger.error("Empty response from LLM")
            raise ProviderTransportError("Empty response from LLM")
        return content
