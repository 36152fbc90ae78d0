import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent

for path in (ROOT, ROOT / "libs"):
    if str(path) not in sys.path:
        sys.path.insert(0, str(path))
