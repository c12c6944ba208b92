import pytest

from indic_gec.corpus import LANGUAGES, Corpus, SentencePair, Split
from indic_gec.mockserver import MockChatServer
from indic_gec.prompting import (
    BatchAborted,
    ChatClient,
    ConfigurationError,
    ProviderError,
    ProviderPreset,
    RateLimiter,
    ResponseCache,
    RetriesExhausted,
    RetryPolicy,
    correct,
    correct_corpus,
    get_template,
    render,
)

HI = LANGUAGES["hi"]
FAST = RetryPolicy(max_attempts=3, base_delay=0.001, jitter=0.0)


def _client(url, dialect="openai"):
    return ChatClient(ProviderPreset("mock", url, None, dialect))


def _bundle(text="मैं घर जाता", model="echo"):
    return render(get_template("gpt-zs"), HI, None, text, model_id=model)


def _corpus(n):
    return Corpus(HI, Split.TEST, [SentencePair(f"test-{i}", f"वाक्य {i}", f"वाक्य {i}।", HI) for i in range(n)])


@pytest.mark.parametrize("dialect", ["openai", "gemini"])
def test_echo_round_trip(mock_server, dialect):
    r = correct(_bundle(), _client(mock_server.url, dialect))
    assert r.normalized_text == "मैं घर जाता" and not r.from_cache
    assert r.provider_meta["attempts"] == 1


def test_retries_then_succeeds():
    with MockChatServer(statuses=[429, 429, 200]) as srv:
        waits = []
        r = correct(_bundle(), _client(srv.url), retry=RetryPolicy(max_attempts=5, base_delay=0.5, jitter=0.0),
                    sleep=waits.append)
    assert r.normalized_text == "मैं घर जाता"
    assert srv.status_log == [429, 429, 200] and r.provider_meta["attempts"] == 3
    assert waits == [0.5, 1.0]


def test_retry_after_is_honoured():
    with MockChatServer(statuses=[503, 200], retry_after=2.5) as srv:
        waits = []
        correct(_bundle(), _client(srv.url), retry=FAST, sleep=waits.append)
    assert waits == [2.5]


def test_gives_up_after_max_attempts():
    with MockChatServer(statuses=[500] * 10) as srv:
        with pytest.raises(RetriesExhausted) as info:
            correct(_bundle(), _client(srv.url), retry=FAST, sleep=lambda s: None)
    assert srv.n_requests == 3 and info.value.status == 500


def test_client_errors_are_not_retried():
    with MockChatServer(statuses=[400]) as srv:
        with pytest.raises(ProviderError) as info:
            correct(_bundle(), _client(srv.url), retry=FAST)
    assert srv.n_requests == 1 and not info.value.transient


def test_transport_error_is_transient():
    with pytest.raises(RetriesExhausted):
        correct(_bundle(), _client("http://127.0.0.1:9"), retry=FAST, sleep=lambda s: None)


def test_cache_hit_skips_network(mock_server, tmp_path):
    cache = ResponseCache(tmp_path)
    client = _client(mock_server.url)
    first = correct(_bundle(), client, cache)
    second = correct(_bundle(), client, cache)
    assert mock_server.n_requests == 1
    assert second.from_cache and second.normalized_text == first.normalized_text
    assert first.cache_key in cache
    rec = cache.get(first.cache_key)
    assert rec["request"]["model_id"] == "echo" and "timestamp" in rec


def test_missing_credentials_fail_before_any_request(monkeypatch):
    monkeypatch.delenv("SOME_GEC_KEY", raising=False)
    with pytest.raises(ConfigurationError, match="SOME_GEC_KEY"):
        ChatClient(ProviderPreset("p", "http://127.0.0.1:9", "SOME_GEC_KEY"))


def test_parallelism_bound_and_warm_rerun(tmp_path):
    with MockChatServer(delay=0.05) as srv:
        client = _client(srv.url)
        cache = ResponseCache(tmp_path)
        corpus = _corpus(16)
        res = correct_corpus(corpus, get_template("gpt-zs"), None, client, cache, parallelism=4, model_id="echo")
        assert len(res.responses) == 16 and not res.failures
        assert 1 < srv.max_in_flight <= 4
        assert list(res.responses) == [p.id for p in corpus.pairs]
        before = srv.n_requests
        again = correct_corpus(corpus, get_template("gpt-zs"), None, client, cache, parallelism=4, model_id="echo")
        assert srv.n_requests == before and again.n_network_calls == 0


def test_batch_failure_threshold(tmp_path):
    with MockChatServer(statuses=[400]) as srv:
        client = _client(srv.url)
        corpus = _corpus(4)
        with pytest.raises(BatchAborted) as info:
            correct_corpus(corpus, get_template("gpt-zs"), None, client, None, model_id="echo", retry=FAST)
        assert len(info.value.result.failures) == 1 and len(info.value.result.responses) == 3
    with MockChatServer(statuses=[400]) as srv:
        res = correct_corpus(corpus, get_template("gpt-zs"), None, _client(srv.url), None, model_id="echo",
                             retry=FAST, failure_threshold=0.5)
        assert len(res.failures) == 1


def test_rate_limiter_spacing():
    now = [0.0]
    slept = []

    def sleep(s):
        slept.append(s)
        now[0] += s

    lim = RateLimiter(120, clock=lambda: now[0], sleep=sleep)
    for _ in range(3):
        lim.acquire()
    assert slept == [0.5, 0.5]
