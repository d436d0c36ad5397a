import re
import subprocess
from pathlib import Path

from setuptools import setup

VERSION_FILE = Path(__file__).parent / "flexlab" / "_version.py"
PRERELEASE = re.compile(r"(a|b|rc)$")


def _git(*args: str) -> str:
    try:
        result = subprocess.run(["git", *args], capture_output=True, text=True, check=False)
    except OSError:
        return ""
    return result.stdout.strip()


def derive_version() -> str:
    match = re.search(r'__version__ = "v?([^"]+)"', VERSION_FILE.read_text())
    if match is None:
        raise RuntimeError(f"no __version__ in {VERSION_FILE}")
    version = match.group(1)

    # prereleases carry the commit count and hash
    if PRERELEASE.search(version):
        version += _git("rev-list", "--count", "HEAD")
        if commit := _git("rev-parse", "--short", "HEAD"):
            version += f"+g{commit}"
    return version


setup(version=derive_version())
