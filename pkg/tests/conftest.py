import pytest

FRENCH = """# sent_id = fr-1
# text = Mon cher ami
1	Mon	mon	DET	_	_	3	det	_	_
2	cher	cher	ADJ	_	_	3	amod	_	_
3	ami	ami	NOUN	_	_	0	root	_	_

# sent_id = fr-2
# text = Mon appartement ancien
1	Mon	mon	DET	_	_	2	det	_	_
2	appartement	appartement	NOUN	_	_	0	root	_	_
3	ancien	ancien	ADJ	_	_	2	amod	_	_

"""


@pytest.fixture
def french_conllu():
    return FRENCH


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")
    config._criteria = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        item.config._criteria.append((marker.args[0], report.outcome))


def pytest_terminal_summary(terminalreporter, config):
    if not config._criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome in config._criteria:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {label}")
