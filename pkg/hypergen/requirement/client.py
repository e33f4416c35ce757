import logging
import re
from dataclasses import dataclass

import requests

from ..config import llm_key
from ..errors import ClientError, DegenerateResponseError
from .schema import Requirement

logger = logging.getLogger(__name__)

SYSTEM_PROMPT = "You summarize machine-learning task requirements."

_SENTENCE_END = re.compile(r'(?<=[.!?])\s+')
_ANSWER_LABEL = re.compile(r'^(answer|final sentence)\s*:\s*', re.IGNORECASE)


@dataclass(frozen=True)
class ProviderConfig:
    endpoint: str
    api_key: str
    model: str = 'gpt-4'
    timeout: float = 60.0
    retries: int = 1


class ChatClient:
    """Blocking client for an OpenAI-style chat-completion endpoint."""

    def __init__(self, config, session=None):
        self.config = config
        self.session = session or requests.Session()

    @classmethod
    def from_settings(cls, settings, session=None):
        llm = settings['llm']
        config = ProviderConfig(endpoint=llm['endpoint'], api_key=llm_key(),
                                model=llm['model'], timeout=float(llm['timeout']),
                                retries=int(llm['retries']))
        return cls(config, session)

    def _headers(self):
        return {
            'Authorization': f'Bearer {self.config.api_key}',
            'Content-Type': 'application/json',
            'Accept': 'application/json',
        }

    def complete(self, messages):
        payload = {'model': self.config.model, 'messages': messages}
        attempts = 1 + max(0, self.config.retries)
        for attempt in range(1, attempts + 1):
            try:
                response = self.session.post(self.config.endpoint, headers=self._headers(),
                                             json=payload, timeout=self.config.timeout)
                break
            except (requests.ConnectionError, requests.Timeout) as e:
                if attempt == attempts:
                    raise ClientError(f"chat endpoint unreachable: {e}") from e
                logger.warning("Chat request failed (%s), retrying", e)
            except requests.RequestException as e:
                raise ClientError(f"chat request failed: {e}") from e

        if response.status_code in (401, 403):
            raise ClientError(f"chat endpoint rejected the credentials (HTTP {response.status_code})")
        if response.status_code >= 400:
            raise ClientError(f"chat endpoint returned HTTP {response.status_code}: {response.text[:200]}")
        try:
            return response.json()['choices'][0]['message']['content'] or ''
        except (ValueError, KeyError, IndexError, TypeError) as e:
            raise ClientError(f"unexpected chat response shape: {e}") from e


def normalize_sentence(text):
    """Collapse a completion to its final sentence, ending with one period.

    Lines from the last ``Answer:`` label onward are joined, so an answer
    wrapped over several lines stays one sentence.
    """
    lines = [line.strip() for line in (text or '').strip().splitlines() if line.strip()]
    start = max((i for i, line in enumerate(lines) if _ANSWER_LABEL.match(line)), default=0)
    answer = ' '.join(_ANSWER_LABEL.sub('', line) for line in lines[start:])
    sentences = [s.strip() for s in _SENTENCE_END.split(answer) if s.strip()]
    if not sentences:
        return ''
    sentence = sentences[-1].rstrip('.!?').strip()
    return f'{sentence}.' if sentence else ''


def summarize(prompt, client, rules=None):
    """Ask the endpoint for the one-sentence requirement behind ``prompt``."""
    from ..hypernet.architecture import DEFAULT_RULES, infer_task_type

    content = client.complete([
        {'role': 'system', 'content': SYSTEM_PROMPT},
        {'role': 'user', 'content': prompt},
    ])
    sentence = normalize_sentence(content)
    if not sentence:
        raise DegenerateResponseError("chat endpoint returned an empty completion")
    requirement = Requirement(sentence, source='llm')
    # raises UnrecognizedRequirementError when the task type is missing
    infer_task_type(requirement, rules=rules or DEFAULT_RULES)
    return requirement
