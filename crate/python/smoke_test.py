"""Smoke test for the genlift_py extension.

Build first with
    cargo build -p genlift-py --features extension-module --release
or install it with maturin (see crates/py/pyproject.toml).
"""

import importlib.machinery
import importlib.util
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import genlift_py

        return genlift_py
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libgenlift_py.so"
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("genlift_py", str(lib))
            spec = importlib.util.spec_from_loader("genlift_py", loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("genlift_py not found; build crates/py first")


def corpus(name):
    return (ROOT / "crates" / "core" / "corpus" / f"{name}.smod").read_text()


def main():
    g = load()

    ipl = g.Program(corpus("ipl"))
    assert ipl.name == "IPL"
    [(value, path)] = ipl.search("f(X,X)", limit=5)
    assert value == "2", value
    assert path[0] == "f(gen,gen)" and path[-1] == "2", path

    clerks = g.Program(corpus("clerks"))
    values = [v for v, _ in clerks.search("search(X)", limit=20)]
    assert "p(madrid,madrid)" in values and "p(madrid,vigo)" in values, values

    coin = g.Program(corpus("coin"))
    assert coin.lift_check("f(X,X)", "2", 8)
    assert coin.rewrites_to("f(coin,coin)", "2", 3)
    assert not coin.rewrites_to("f(0,0)", "2", 5)

    pair = g.Program("(smod P is f -> pair(X, X) . g -> 0 . g -> 1 . ends)")
    assert pair.has_extra_vars()
    assert pair.derivable("f", "pair(0,1)", 5) == "proved"
    assert "f -> pair(gen,gen)" in pair.transformed_rules(), pair.transformed_rules()

    s = g.Session()
    assert s.run(corpus("party")) == "Module PARTY loaded."
    assert s.run("(path on .)") == "Path activated."
    assert s.run("(eval-gen success(F, S) .)") == "Result: tt"
    assert s.run("(show path .)").endswith("haveFun(fun)\n--->\ntt")
    assert s.run("(frobnicate .)").startswith("Error:")

    transcript, failed = g.run_script(corpus("ipl") + "\n(eval-gen f(X,X) .)\n")
    assert "Result: 2" in transcript and not failed

    assert g.parse_term("f( X ,c(Y))") == "f(X,c(Y))"
    try:
        g.Program("(smod BAD is f(X, X) -> X . ends)")
    except ValueError as e:
        assert "linear" in str(e)
    else:
        raise AssertionError("non-linear rule accepted")

    print("genlift_py smoke test passed")


if __name__ == "__main__":
    main()
