import itertools

import pandas as pd
import pytest
import requests

from hypergen.config import LLM_KEY_ENV, default_settings
from hypergen.errors import (ClientError, ConfigError, DegenerateResponseError, InputError,
                             UnrecognizedRequirementError)
from hypergen.hypernet.architecture import build_arch_spec, infer_task_type
from hypergen.requirement import (ChatClient, ProviderConfig, RequirementGenerator, TaskMeta,
                                  UserInput, build_prompt, fallback_template, normalize_sentence,
                                  summarize, user_input_from_frame)
from hypergen.requirement.prompt import RULE_DATA_FOCUS, RULE_TASK_TYPE


class FakeResponse:
    def __init__(self, status_code=200, payload=None, text=''):
        self.status_code = status_code
        self._payload = payload
        self.text = text

    def json(self):
        if self._payload is None:
            raise ValueError('no json')
        return self._payload


class FakeSession:
    """Replays a queue of responses (or exceptions) and records the calls."""

    def __init__(self, *outcomes):
        self.outcomes = list(outcomes)
        self.calls = []

    def post(self, url, headers=None, json=None, timeout=None):
        self.calls.append({'url': url, 'headers': headers, 'json': json, 'timeout': timeout})
        outcome = self.outcomes.pop(0)
        if isinstance(outcome, Exception):
            raise outcome
        return outcome


def answer(content):
    return FakeResponse(200, {'choices': [{'message': {'content': content}}]})


def client_with(*outcomes):
    session = FakeSession(*outcomes)
    return ChatClient(ProviderConfig('https://chat.invalid/v1', 'secret'), session), session


META_GRID = [TaskMeta('classification', f, c, tag)
             for f, c, tag in itertools.product((1, 4, 13, 30), (2, 3, 5, 10),
                                                ('flower measurements', None))]
META_GRID += [TaskMeta('regression', f, None, tag)
              for f, tag in itertools.product((1, 2, 6, 8), ('house prices', None))]


def test_grid_has_forty_cases():
    assert len(META_GRID) == 40


@pytest.mark.parametrize('meta', META_GRID)
def test_fallback_template_round_trips(meta):
    requirement = fallback_template(meta)
    assert requirement.source == 'template'
    assert requirement.sentence.endswith('.')
    task = infer_task_type(requirement)
    assert task.kind == meta.task_type
    assert task.n_classes == meta.n_classes
    assert task.n_inputs == meta.n_features


def test_fallback_template_sentence():
    requirement = fallback_template(TaskMeta('classification', 4, 3, 'iris flowers'))
    assert requirement.sentence == ('This is a tabular classification into 3 classes task '
                                    'on 4-dimensional rows from iris flowers.')


def test_fallback_template_needs_two_classes():
    with pytest.raises(InputError):
        fallback_template(TaskMeta('classification', 4, 1))


def test_user_input_needs_something():
    with pytest.raises(InputError):
        UserInput(description='  ')
    with pytest.raises(InputError):
        UserInput(description='x', modality='audio')


def test_build_prompt_quotes_both_rules():
    prompt = build_prompt(UserInput(data_sample=[('a=1, b=2', 'yes')]))
    assert RULE_TASK_TYPE in prompt
    assert RULE_DATA_FOCUS in prompt
    assert 'a=1, b=2 -> yes' in prompt


def test_build_prompt_drops_empty_slots():
    prompt = build_prompt(UserInput(description='Readings from a weather station.'))
    assert 'User Description: Readings from a weather station.' in prompt
    assert '{USER_DATA}' not in prompt
    assert prompt.rstrip().endswith('Readings from a weather station.')


def test_text_template_is_selected_by_modality():
    prompt = build_prompt(UserInput(description='movie reviews', modality='text'))
    assert RULE_TASK_TYPE in prompt
    assert prompt != build_prompt(UserInput(description='movie reviews'))


def test_build_prompt_caps_rows():
    rows = [(f'x={i}', str(i % 2)) for i in range(20)]
    prompt = build_prompt(UserInput(data_sample=rows), max_rows=3)
    assert 'x=2 -> 0' in prompt
    assert 'x=3 -> 1' not in prompt


@pytest.mark.parametrize('modality', ['tabular', 'text'])
def test_build_prompt_keeps_labels_out_of_instructions(modality):
    labels = ['quokka_grade', 'narwhal_grade']
    rows = [(f'x={i}', labels[i % 2]) for i in range(4)]
    prompt = build_prompt(UserInput(data_sample=rows, modality=modality))
    instructions, _, user_part = prompt.rpartition('User Data:')
    assert RULE_DATA_FOCUS in instructions
    for label in labels:
        assert label not in instructions
        assert f'-> {label}' in user_part


def test_user_input_from_frame():
    frame = pd.DataFrame({'a': [1, 2], 'b': ['u', 'v'], 'label': ['p', 'q']})
    user_input = user_input_from_frame(frame, 'label', 'two rows')
    assert user_input.data_sample == (('a=1, b=u', 'p'), ('a=2, b=v', 'q'))


@pytest.mark.parametrize('raw, expected', [
    ('Reasoning: four numbers.\nAnswer: This is a tabular regression task.',
     'This is a tabular regression task.'),
    ('It has rows. This is binary classification!', 'This is binary classification.'),
    ('  one sentence without stop  ', 'one sentence without stop.'),
    ('Answer: This is a tabular classification task\non car purchase acceptability.',
     'This is a tabular classification task on car purchase acceptability.'),
    ('', ''),
])
def test_normalize_sentence(raw, expected):
    assert normalize_sentence(raw) == expected


def test_summarize_returns_llm_requirement():
    client, session = client_with(answer(
        'Thinking...\nAnswer: This is a tabular classification into 3 classes task on wine.'))
    requirement = summarize('prompt text', client)
    assert requirement.source == 'llm'
    assert requirement.sentence.endswith('task on wine.')
    call = session.calls[0]
    assert call['headers']['Authorization'] == 'Bearer secret'
    assert call['json']['messages'][-1] == {'role': 'user', 'content': 'prompt text'}


def test_summarize_keeps_answer_wrapped_over_lines():
    client, _ = client_with(answer(
        'Answer: This is a tabular classification task\non car purchase acceptability.'))
    requirement = summarize('prompt text', client)
    assert requirement.source == 'llm'
    assert requirement.sentence == ('This is a tabular classification task '
                                    'on car purchase acceptability.')


def test_summarize_rejects_empty_and_untyped_answers():
    client, _ = client_with(answer('   '))
    with pytest.raises(DegenerateResponseError):
        summarize('p', client)
    client, _ = client_with(answer('The rows describe some flowers.'))
    with pytest.raises(UnrecognizedRequirementError):
        summarize('p', client)


def test_client_retries_once_on_connection_error():
    client, session = client_with(requests.ConnectionError('down'), answer('ok'))
    assert client.complete([]) == 'ok'
    assert len(session.calls) == 2


def test_client_gives_up_after_retries():
    client, _ = client_with(requests.Timeout('slow'), requests.Timeout('slow'))
    with pytest.raises(ClientError):
        client.complete([])


@pytest.mark.parametrize('response', [FakeResponse(401), FakeResponse(500, text='boom'),
                                      FakeResponse(200, {'unexpected': True})])
def test_client_errors(response):
    client, _ = client_with(response)
    with pytest.raises(ClientError):
        client.complete([])


def test_client_needs_key(monkeypatch):
    monkeypatch.delenv(LLM_KEY_ENV, raising=False)
    with pytest.raises(ConfigError):
        ChatClient.from_settings(default_settings())
    monkeypatch.setenv(LLM_KEY_ENV, 'k')
    assert ChatClient.from_settings(default_settings()).config.api_key == 'k'


def test_resolve_falls_back_to_template():
    meta = TaskMeta('classification', 4, 3, 'iris')
    client, _ = client_with(FakeResponse(503))
    generator = RequirementGenerator(client)
    requirement = generator.resolve(meta, UserInput(description='flowers'))
    assert requirement == fallback_template(meta)


def test_resolve_without_client_uses_template():
    meta = TaskMeta('regression', 2)
    assert RequirementGenerator().resolve(meta).sentence == \
        'This is a tabular regression task on 2-dimensional rows.'


def test_resolve_prefers_llm_answer():
    meta = TaskMeta('classification', 4, 3)
    client, _ = client_with(answer('Answer: A binary classification of the rows.'))
    requirement = RequirementGenerator(client).resolve(meta, UserInput(description='d'))
    assert requirement.source == 'llm'


def test_free_form_sentence_leaves_counts_open():
    task = infer_task_type('Binary sentiment analysis of movie reviews.')
    assert (task.kind, task.n_classes, task.n_inputs) == ('classification', 2, None)
    with pytest.raises(InputError, match='input dimension'):
        build_arch_spec(task)
