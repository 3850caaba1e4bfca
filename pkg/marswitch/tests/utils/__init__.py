from .capture_cmd_output import CaptureCmdOutput


__all__ = ["CaptureCmdOutput"]
