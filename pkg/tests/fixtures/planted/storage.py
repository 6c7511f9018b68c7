class LedgerStore:
    """Append-only ledger persisted as numbered segments."""

    def __init__(self, segments=None):
        self.segments = segments or []

    def append_entry(self, ledger_entry):
        """Append one ledger entry to the newest segment."""
        if not self.segments:
            self.segments.append([])
        self.segments[-1].append(ledger_entry)
        return len(self.segments[-1])

    def compact_segments(self, max_size):
        """Fold small segments together until each is under max_size."""
        folded = [[]]
        for segment in self.segments:
            if len(folded[-1]) + len(segment) > max_size:
                folded.append([])
            folded[-1].extend(segment)
        self.segments = folded
