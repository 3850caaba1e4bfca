import os
import warnings
from pathlib import Path

from ..config import get_setting


def uniquify_fname(file_path):
    "Add a number to filename if it already exists."
    file_path = Path(file_path)
    if file_path.exists():
        parent = file_path.parent
        stem = file_path.stem
        suffix = file_path.suffix
        i = 1
        while (parent / f"{stem}_{i}{suffix}").exists():
            i += 1
        alternative = parent / f"{stem}_{i}{suffix}"
        if get_setting("warn_nonunique_files"):
            warnings.warn(
                f"{file_path} already exists. Saving results to {alternative}"
            )
        return alternative
    else:
        return file_path


def atomic_write_text(path, text):
    """Write ``text`` in ``path`` as UTF-8 with LF line endings.

    The content goes to a temporary file in the same folder which is then
    renamed, so readers never see a partial file.
    """
    path = Path(path)
    tmp_path = path.with_name(f".{path.name}.tmp")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(tmp_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp_path, path)
    except OSError as e:
        if tmp_path.exists():
            tmp_path.unlink()
        raise OSError(f"Could not write {path}: {e}") from e
    return path
