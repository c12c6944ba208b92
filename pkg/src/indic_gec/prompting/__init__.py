from .cache import ResponseCache
from .client import (
    BUILTIN_PROVIDERS,
    ChatClient,
    ConfigurationError,
    EmptyResponseError,
    ProviderError,
    ProviderPreset,
    RateLimiter,
    load_providers,
)
from .correction import (
    BatchAborted,
    BatchResult,
    ModelResponse,
    RetriesExhausted,
    RetryPolicy,
    correct,
    correct_corpus,
    normalize_response,
)
from .templates import (
    PRESETS,
    ExemplarSet,
    PromptBundle,
    PromptError,
    PromptTemplate,
    Provenance,
    Style,
    get_template,
    render,
    select_exemplars,
)
