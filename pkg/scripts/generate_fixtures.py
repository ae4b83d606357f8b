#!/usr/bin/env python3
"""Regenerate the checked-in synthetic fixtures under fixtures/.

The fixture files are fully determined by the seeds in
:mod:`gpsurf.fixtures`; rerunning this script must reproduce them
byte-for-byte.  Never edit the fixture files by hand.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from gpsurf import fileio
from gpsurf.fixtures import turned_profile_field, turned_surface_field


def main():
    out_dir = pathlib.Path(__file__).resolve().parents[1] / "fixtures"
    out_dir.mkdir(exist_ok=True)
    targets = {
        "turned_profile.txt": turned_profile_field(),
        "turned_surface.txt": turned_surface_field(),
    }
    for name, field in targets.items():
        path = out_dir / name
        fileio.write_surface_file(field, path)
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
