import io
import os
import re
import shutil
import subprocess
import sys

import pytest

from gipsy import compile_source, serialize
from gipsy.cli import gee, gipc, regression
from gipsy.host.builtins import standard_registry
from gipsy.host.manifest import load_manifest

NAT2 = "N @.d 2 where dimension d; N = if (#.d <= 0) then 42 else (N + 1) @.d (#.d - 1) fi; end\n"


@pytest.fixture
def nat2(tmp_path):
    path = tmp_path / "nat2.ipl"
    path.write_text(NAT2)
    return path


def test_gipc_writes_program(nat2, capsys):
    assert gipc.main(["--gipl", str(nat2)]) == 0
    assert (nat2.parent / "nat2.gipsy").exists()
    assert capsys.readouterr().out == ""


def test_gipc_gee(nat2, capsys):
    assert gipc.main(["--gipl", "--gee", str(nat2)]) == 0
    assert capsys.readouterr().out == "0: 44\n"


def test_gipc_conflicting_dialects(nat2, capsys):
    assert gipc.main(["--gipl", "--indexical", str(nat2)]) == 2
    assert "usage error" in capsys.readouterr().err


def test_gipc_compile_error(tmp_path, capsys):
    bad = tmp_path / "bad.ipl"
    bad.write_text("N @.d\n")
    assert gipc.main(["--gipl", str(bad)]) == 1
    err = capsys.readouterr().err
    assert re.match(rf"{re.escape(str(bad))}:\d+:\d+: LucidSyntaxError: ", err)


def test_gipc_disable_translate(tmp_path, capsys):
    src = tmp_path / "nat1.ipl"
    src.write_text("N @.d 2 where dimension d; N = 42 fby.d (N + 1); end\n")
    assert gipc.main(["--indexical", "--disable-translate", str(src)]) == 1
    assert "Unsupported" in capsys.readouterr().err


def test_gipc_warnings_as_errors(tmp_path, capsys):
    src = tmp_path / "j.ipl"
    src.write_text("#JAVA\nint f() { return 1; }\n#GIPL\n1\n")
    assert gipc.main([str(src)]) == 0
    assert "warning" in capsys.readouterr().err
    assert gipc.main(["--warnings-as-errors", str(src)]) == 1


def test_gipc_stdin(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setattr(sys, "stdin", io.StringIO(NAT2))
    assert gipc.main(["--gipl", "--stdin"]) == 0
    assert (tmp_path / "stdin.gipsy").exists()


@pytest.mark.parametrize("flag", ["--rmi", "--jini", "--dcom", "--corba", "--dfg"])
def test_absent_transports(nat2, flag, capsys):
    assert gee.main([flag, str(nat2)]) == 2
    assert "unsupported in this build" in capsys.readouterr().err


@pytest.fixture
def compiled(nat2):
    gipc.main(["--gipl", str(nat2)])
    return nat2.parent / "nat2.gipsy"


@pytest.mark.parametrize("extra", [[], ["--socket"], ["--rmi-analog=socket"], ["--threaded"],
                                   ["--warehouse-capacity=0"]])
def test_gee(compiled, extra, capsys):
    capsys.readouterr()
    assert gee.main(extra + [str(compiled)]) == 0
    assert capsys.readouterr().out == "0: 44\n"


def test_gee_missing_file(tmp_path, capsys):
    assert gee.main([str(tmp_path / "missing.gipsy")]) == 1
    assert "cannot read" in capsys.readouterr().err


def test_gee_corrupt_file(tmp_path, capsys):
    bad = tmp_path / "bad.gipsy"
    bad.write_bytes(b'{"version": 1')
    assert gee.main([str(bad)]) == 1
    assert "FormatError" in capsys.readouterr().err


def test_gee_bad_capacity(compiled, capsys):
    assert gee.main(["--warehouse-capacity=-1", str(compiled)]) == 2


def test_gee_registry_manifest(tmp_path, capsys):
    (tmp_path / "lib.manifest").write_text("square : (int) -> int immutable\n")
    src = tmp_path / "sq.ipl"
    src.write_text("#funcdecl\nimmutable int square(int);\n#GIPL\nsquare(7)\n")
    # the program only links against a registry that knows square
    assert gipc.main([str(src)]) == 1
    capsys.readouterr()
    reg = standard_registry()
    load_manifest(reg, str(tmp_path / "lib.manifest"))
    (tmp_path / "sq.gipsy").write_bytes(serialize(compile_source(src.read_text(), registry=reg)))
    assert gee.main([str(tmp_path / "sq.gipsy")]) == 1
    capsys.readouterr()
    assert gee.main(["--registry", str(tmp_path / "lib.manifest"),
                     str(tmp_path / "sq.gipsy")]) == 0
    assert capsys.readouterr().out == "0: 49\n"


def test_debug_does_not_change_results(compiled, capsys):
    gee.main([str(compiled)])
    plain = capsys.readouterr()
    gee.main(["--debug", str(compiled)])
    noisy = capsys.readouterr()
    assert plain.out == noisy.out
    assert "[debug]" in noisy.err and "[debug]" not in plain.err


def test_multi_tree_output_lines_are_whole(tmp_path):
    src = tmp_path / "m.ipl"
    src.write_text("".join(f"#GIPL\n{i} * 1000\n" for i in range(30)))
    subprocess.run([sys.executable, "-m", "gipsy.cli.gipc", str(src)], check=True)
    out = subprocess.run([sys.executable, "-m", "gipsy.cli.gee", "--threaded",
                          str(tmp_path / "m.gipsy")],
                         capture_output=True, text=True, check=True).stdout
    assert out.splitlines() == [f"{i}: {i * 1000}" for i in range(30)]


@pytest.fixture
def corpus(tmp_path):
    root = tmp_path / "corpus"
    shutil.copytree(regression.default_corpus(), root,
                    ignore=shutil.ignore_patterns("current"))
    return root


def test_regression_gipl(corpus, capsys):
    assert regression.main(["--gipl", f"--directory={corpus}"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[-1].endswith("passed, 0 failed")
    assert all(line.startswith("PASS gipl/") for line in out[:-1])


def test_regression_parallel_matches_sequential(corpus, capsys):
    regression.main(["--indexical", "--gee", f"--directory={corpus}"])
    seq = capsys.readouterr().out
    regression.main(["--indexical", "--gee", "--parallel", f"--directory={corpus}"])
    assert capsys.readouterr().out == seq


def test_regression_reports_one_diff(corpus, capsys):
    target = corpus / "gipl" / "expected" / "nat2.gee"
    target.write_text("0: 45\n")
    assert regression.main(["--all", f"--directory={corpus}"]) == 1
    out = capsys.readouterr().out
    assert out.count("FAIL ") == 1 and "FAIL gipl/nat2" in out
    assert out.count("\n--- ") == 1 and "-0: 45" in out and "+0: 44" in out


def test_regression_bless(corpus, capsys):
    (corpus / "gipl" / "expected" / "nat2.gee").write_text("0: 45\n")
    assert regression.main(["--gipl", "--gee", "--bless", f"--directory={corpus}"]) == 0
    assert (corpus / "gipl" / "expected" / "nat2.gee").read_text() == "0: 44\n"


def test_regression_bad_directory(tmp_path, capsys):
    assert regression.main([f"--directory={tmp_path / 'nope'}"]) == 2


@pytest.mark.skipif(shutil.which("gee") is None, reason="console scripts not installed")
def test_console_scripts(compiled):
    out = subprocess.run(["gee", str(compiled)], capture_output=True, text=True)
    assert (out.returncode, out.stdout) == (0, "0: 44\n")
    assert os.path.exists(compiled)
