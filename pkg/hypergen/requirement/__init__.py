from .client import ChatClient, ProviderConfig, normalize_sentence, summarize
from .prompt import build_prompt, load_template, user_input_from_frame
from .schema import Requirement, TaskMeta, UserInput
from .template import RequirementGenerator, fallback_template
