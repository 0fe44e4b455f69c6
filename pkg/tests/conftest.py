"""Shared fixtures: an in-process CLI runner."""

import contextlib
import io

import pytest

from polyharm import cli


@pytest.fixture
def run_cli():
    """Invoke the command line in process, capturing streams.

    Returns a callable mapping an argv list to (exit_code, stdout, stderr).
    """

    def run(argv):
        out, err = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = cli.main(argv)
        return code, out.getvalue(), err.getvalue()

    return run
