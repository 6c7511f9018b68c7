TEMPLATE = """
Subject: {subject}

Body text starts flush left.
"""


def render(subject):
    text = """
inner flush-left content
    indented content
"""
    return TEMPLATE.format(subject=subject) + text
