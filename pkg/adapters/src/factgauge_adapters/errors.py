class AdapterError(Exception):
    """Adapter cannot start or a file operation failed."""


class ProtocolError(AdapterError):
    """A message or request file violates the wire protocol."""
