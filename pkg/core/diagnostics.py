"""
Diagnostics Bus
Collects notes that commands post while they run (grid extensions, non-monotone
estimate sequences, auto-selected truncations) for the report's diagnostics array
"""
import logging

logger = logging.getLogger(__name__)


class Note:
    def __init__(self, source, kind, content):
        self.source = source
        self.kind = kind
        self.content = content

    def to_dict(self):
        return {"source": self.source, "kind": self.kind, "content": self.content}

    def __repr__(self):
        return f"[{self.source}] {self.kind}: {self.content}"


class DiagnosticsBus:
    def __init__(self):
        self.history = []

    def post(self, source, kind, content):
        """Record a note and mirror it to the log"""
        note = Note(source, kind, content)
        self.history.append(note)
        logger.info("%r", note)
        return note

    def get_history(self, limit=None):
        if limit:
            return self.history[-limit:]
        return list(self.history)

    def to_list(self):
        return [note.to_dict() for note in self.history]
