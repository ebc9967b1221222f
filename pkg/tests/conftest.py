import pytest

from gramcoach import grammar as gr
from gramcoach.resources import read_data


@pytest.fixture(scope="session")
def toy_source():
    return read_data("data/toy.tdl")


@pytest.fixture(scope="session")
def under_source():
    return read_data("data/toy_underconstrained.tdl")


@pytest.fixture(scope="session")
def g_learner(toy_source):
    return gr.load_grammar(toy_source, "learner")


@pytest.fixture(scope="session")
def g_strict(toy_source):
    return gr.load_grammar(toy_source, "strict")


@pytest.fixture(scope="session")
def g_under(under_source):
    return gr.load_grammar(under_source, "strict")


@pytest.fixture(scope="session")
def grammatical_suite():
    from gramcoach import profiling

    return profiling.load_suite(read_data("data/suites/grammatical.items"))


@pytest.fixture(scope="session")
def learner_suite():
    from gramcoach import profiling

    return profiling.load_suite(read_data("data/suites/learner.items"))


@pytest.fixture(scope="session")
def ambiguity_suite():
    from gramcoach import profiling

    return profiling.load_suite(read_data("data/suites/ambiguity.items"))


@pytest.fixture(scope="session")
def desk_suite(grammatical_suite, learner_suite, ambiguity_suite):
    items = []
    for n, item in enumerate(grammatical_suite + learner_suite + ambiguity_suite):
        items.append(
            type(item)(f"d{n:02d}", item.sentence, item.expected, item.starred)
        )
    return items


@pytest.fixture(scope="session")
def mini_treebank(g_strict):
    from gramcoach import treebank

    return treebank.load_treebank(read_data("data/mini_treebank.tsv"))
