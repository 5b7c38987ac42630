"""
The same workflow through the command line
==========================================

Everything the library does is reachable from the `ifcm` console command.
This script stages a corpus in a temp directory and drives the commands
exactly as a shell user would: train, inspect, classify with an
explanation, export a trace, and grid-search the two model-size knobs.
"""
import pathlib
import tempfile

from ifcm import write_pack
from ifcm.cli import main
from synthetic_corpus import make_corpus

root = pathlib.Path(tempfile.mkdtemp(prefix="ifcm-demo-"))
data = root / "packs"
data.mkdir()
for pack in make_corpus(per_class=12, n_classes=2, seed=3):
    write_pack(pack, str(data / f"{pack.image_id}.ifp"))
(root / "classes.txt").write_text("1,Flamingo\n2,Rhino\n")
query = sorted(data.glob("*.ifp"))[0]


def run(*argv):
    print(f"\n$ ifcm {' '.join(argv)}")
    code = main(list(argv))
    print(f"(exit {code})")


run("train", "--data", str(data), "--out", str(root / "model"),
    "--classes", str(root / "classes.txt"),
    "--clusters", "2", "--sets", "4", "--mf", "triangular")

run("inspect", "--model", str(root / "model"))

run("classify", "--model", str(root / "model"), "--input", str(query),
    "--explain")

run("trace", "--model", str(root / "model"), "--input", str(query),
    "--out", str(root / "trace.csv"))
print("trace head:")
for line in (root / "trace.csv").read_text().splitlines()[:3]:
    print(f"  {line}")

run("gridsearch", "--data", str(data), "--out", str(root / "report.csv"),
    "--cluster-candidates", "1", "2", "--set-candidates", "4",
    "--folds", "2", "--mf", "triangular")

print(f"\nworkspace kept at {root}")
