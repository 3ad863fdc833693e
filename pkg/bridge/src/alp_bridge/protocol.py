"""Wire format of the alp-bridge/1 protocol.

One JSON object per line over stdin/stdout, strict request/response
alternation. Request kinds: hello, fit, predict_proba, embed, shutdown.
Every response carries "ok"; failures add "error" with a message and the
process stays alive (except after shutdown).
"""

PROTOCOL_VERSION = "alp-bridge/1"

REQUEST_KINDS = ("hello", "fit", "predict_proba", "embed", "shutdown")

# required request fields beyond "kind"
REQUIRED_FIELDS = {
    "hello": ("version",),
    "fit": ("X", "y", "n_classes", "seed"),
    "predict_proba": ("X",),
    "embed": ("X",),
    "shutdown": (),
}


def error(message: str) -> dict:
    return {"ok": False, "error": str(message)}


def validate_request(message) -> str | None:
    """The problem with a decoded request, or None if well-formed."""
    if not isinstance(message, dict):
        return "request must be a JSON object"
    kind = message.get("kind")
    if kind not in REQUEST_KINDS:
        return f"unknown request kind {kind!r}"
    missing = [f for f in REQUIRED_FIELDS[kind] if f not in message]
    if missing:
        return f"{kind} request missing fields: {missing}"
    return None
