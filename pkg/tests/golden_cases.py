"""CLI invocations pinned by golden files; run this module to regenerate them."""
import io
import sys
from contextlib import redirect_stdout
from pathlib import Path

from beamsym.cli import run

HERE = Path(__file__).parent
DATA = HERE / "data"
GOLDEN = HERE / "golden"

CASES = {
    "classify_uniform": ["classify", "--beam", str(DATA / "uniform.beam")],
    "classify_linear": ["classify", "--beam", str(DATA / "linear.beam"), "--samples", "12"],
    "classify_exponential": ["classify", "--beam", str(DATA / "exponential.beam"), "--samples", "12"],
    "canonicalize_uniform": ["canonicalize", "--beam", str(DATA / "uniform.beam"),
                             "--constants", "0.5", "0.25", "2"],
    "canonicalize_inverse_square": ["canonicalize", "--f", "1", "--m", "x^(-4)", "--interval", "1", "2"],
    "gottlieb_three_halves": ["gottlieb", "--exponent", "3/2", "--A", "1", "--B", "1", "--K", "1",
                              "--mobius", "0,1,1,0", "--interval", "0", "1"],
    "spectrum_uniform": ["spectrum", "--beam", str(DATA / "uniform.beam"), "--N", "256",
                         "--n-modes", "2"],
    "isospectral_quartic": ["isospectral-check", "--f", "(1+x)^4", "--m", "(1+x)^4",
                            "--interval", "0", "1", "--N", "512"],
    "reduce_quartic": ["reduce", "--f", "(1+x)^4", "--interval", "0", "1", "--samples", "9"],
}


def invoke(argv, fmt="structured"):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = run([*argv, "--format", fmt])
    return code, buf.getvalue()


def regenerate():
    GOLDEN.mkdir(exist_ok=True)
    for name, argv in CASES.items():
        code, text = invoke(argv)
        (GOLDEN / f"{name}.json").write_text(text, encoding="utf-8")
        print(f"{name}: exit {code}", file=sys.stderr)


if __name__ == "__main__":
    regenerate()
