def grüße(name):
    # Grußformel für späteren Ausbau, enthält Umlaute
    return f"Hallo, {name}!"


def plain(name):
    """Docstring mit Umlauten: äöü."""
    return name
