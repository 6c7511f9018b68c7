class TextCleaner:
    """Removes control characters and collapses whitespace."""

    def clean(self, text):
        # Control chars below 0x20 except tab/newline are dropped.
        kept = [ch for ch in text if ch >= " " or ch in "\t\n"]
        return " ".join("".join(kept).split())
