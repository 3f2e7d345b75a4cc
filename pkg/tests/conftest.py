import io

import pytest

from altsent.corpus import ArticleRecord, TweetMention
from altsent.sentiment import load_lexicon, sample_lexicon


@pytest.fixture(scope="session")
def lexicon():
    return sample_lexicon()


@pytest.fixture(scope="session")
def tiny_lexicon():
    text = "good\t1.9\nbad\t-2.5\nhappy\t2.7\nsad\t-2.1\n:)\t2.0\n[boosters]\nvery\t1\n[negations]\nnot\t0\n"
    return load_lexicon(io.StringIO(text))


def make_record(rid="a1", title="A good result", abstract="We find a good thing here today", authors=3,
                subjects=("Medicine",), tweets=(("nice paper", 10, "2015-03-01T00:00:00Z"),), year=2015):
    return ArticleRecord(
        id=rid,
        title=title,
        abstract=abstract,
        author_count=authors,
        subjects=tuple(subjects),
        tweets=tuple(TweetMention(t, f, p) for t, f, p in tweets),
        publication_year=year,
    )


# ---------------------------------------------------------------- acceptance summary

_CRITERIA: dict[int, tuple[str, bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = _MARKERS.get(report.nodeid)
    if marker is None:
        return
    number, title = marker
    ok = report.outcome == "passed"
    prev = _CRITERIA.get(number, (title, True))[1]
    _CRITERIA[number] = (title, prev and ok)


_MARKERS: dict[str, tuple[int, str]] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _MARKERS[item.nodeid] = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {title}")
