import hashlib
from pathlib import Path

from .correspondence import BinningSpec
from .errors import FileAccessError, FormatError


def split_names(text: str, *, count: int | None = None, flag: str = "--vars") -> list[str]:
    """Split a comma separated list of names.

    Example:
    -------
    >>> split_names("c, n", count=2)
    ['c', 'n']

    """
    names = [n.strip() for n in text.split(",") if n.strip()]
    if count is not None and len(names) != count:
        raise FormatError(f"{flag} expects {count} names, got '{text}'.", origin="cli.flags")
    if len(set(names)) != len(names):
        raise FormatError(f"{flag} names must be distinct, got '{text}'.", origin="cli.flags")
    return names


def parse_floats(text: str, *, flag: str) -> list[float]:
    """Parse a comma separated list of numbers.

    Example:
    -------
    >>> parse_floats("0, 1.5,3", flag="--edges-a")
    [0.0, 1.5, 3.0]

    """
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise FormatError(f"{flag} expects numbers, got '{text}'.", origin="cli.flags") from None


def binning_from_flags(bins: int | None, edges: str | None, *, flag: str) -> BinningSpec | None:
    """Binning chosen by a ``--bins-*``/``--edges-*`` pair (``None`` if neither is given).

    Example:
    -------
    >>> binning_from_flags(4, None, flag="--bins-b")
    BinningSpec(mode='equal-width', bin_count=4, edges=None)

    """
    if bins is not None and edges is not None:
        raise FormatError(f"Give either bins or edges for {flag}, not both.", origin="cli.flags")
    if edges is not None:
        return BinningSpec.explicit(parse_floats(edges, flag=flag))
    if bins is not None:
        return BinningSpec.equal_width(bins)
    return None


def file_digest(path: Path | str) -> str:
    """Return ``sha256:<hex>`` of a file's content."""
    digest = hashlib.sha256()
    try:
        with open(path, "rb") as stream:
            for chunk in iter(lambda: stream.read(1 << 16), b""):
                digest.update(chunk)
    except OSError as error:
        raise FileAccessError(f"Cannot read {path}: {error.strerror}.", origin="cli.io") from None
    return f"sha256:{digest.hexdigest()}"


def write_text(path: Path | str, text: str) -> None:
    """Write ``text`` as UTF-8 with the line endings given.

    :raises FileAccessError: If the file cannot be written.
    """
    try:
        with open(path, "w", encoding="utf-8", newline="") as stream:
            stream.write(text)
    except OSError as error:
        raise FileAccessError(f"Cannot write {path}: {error.strerror}.", origin="cli.io") from None
