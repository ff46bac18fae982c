"""
Module providing helpers for generating text: line based text blocks and markdown tables that
are used for rendering identified equations and result tables.

Copyright (c) 2024 The linfsindy developers
This is free software, released under the MIT License. Refer to linfsindy/LICENSE.
"""

# system modules
from dataclasses import dataclass, field
from typing import Any, List, Optional
from typing_extensions import Self

# linfsindy modules
from .misc_utils import assert_t

# constants
EOL = '\n'
BLANK_LINE = EOL  # alias
SPACE = ' '
DEFAULT_INDENT_NR_SPACES = 4


def flatten_to_strlist(value: Any) -> List[str]:
    """Flatten and stringify the argument into a 1-dimensional list of strings. Nested lists and
    tuples are processed recursively, None items are skipped and strings containing newlines are
    split into separate lines."""
    if value is None:
        return []
    if isinstance(value, TextBlock):
        return list(value.lines)
    if isinstance(value, (list, tuple)):
        result = []
        for item in value:
            result.extend(flatten_to_strlist(item))
        return result

    text = str(value)
    return text.splitlines() if text else ['']


@dataclass
class Indentizer:
    """Class containing the indentation configuration and functionality to process contents."""
    spaces_count: int = field(default=DEFAULT_INDENT_NR_SPACES)
    bullet: Optional[str] = field(default=None)

    def __post_init__(self):
        """Postcheck the constructed data class members on validity."""
        assert_t(self.spaces_count, int)
        if self.spaces_count < 0:
            raise ValueError('spaces_count can not be negative')

    def to_list(self, lines: List[str]) -> List[str]:
        """Indent each non-empty line, optionally prefixing it with the configured bullet."""
        prefix = SPACE * self.spaces_count
        if self.bullet:
            prefix = f'{self.bullet} '.ljust(self.spaces_count)
        return [f'{prefix}{line}' if line.strip() else '' for line in lines]


class TextBlock:
    """"A class to store, extend, indent and stringify a collection of string lines that
    together form a logical text block."""
    _lines: List[str]

    def __init__(self, content: Optional[Any] = None):
        self._lines = []
        self.append(content)

    def __str__(self) -> str:
        """"Stringify the lines to an EOL delimited and an EOL-ending string."""
        if not self._lines:
            return ''
        return EOL.join(self._lines) + EOL

    def __iadd__(self, other: Any) -> Self:
        """In-place operator to add something else to the contents of this (self) instance."""
        self.append(other)
        return self

    @property
    def lines(self) -> List[str]:
        """Access the collection of text lines, without end-of-line characters."""
        return self._lines

    def append(self, content: Any) -> Self:
        """Append more content, flattened to a list of lines first.
        As return value a self reference is returned (see Fluent Interface)."""
        self._lines.extend(flatten_to_strlist(content))
        return self

    def indent(self, indentizer: Optional[Indentizer] = None) -> Self:
        """Indent all lines with the specified or otherwise the default indentizer.
        As return value a self reference is returned (see Fluent Interface)."""
        self._lines = (indentizer or Indentizer()).to_list(self._lines)
        return self


# A shortcut alias for the TextBlock class
TB = TextBlock


@dataclass
class MarkdownTable:
    """A github flavoured markdown table. Cells are stringified on rendering and columns are
    padded to equal width so the raw text stays readable."""
    header: List[str]
    rows: List[List[Any]] = field(default_factory=list)

    def __post_init__(self):
        """Postcheck the constructed data class members on validity."""
        if not self.header:
            raise ValueError('A markdown table requires at least one column')

    def add_row(self, cells: List[Any]) -> Self:
        """Add a row of cells, its length must match the header."""
        if len(cells) != len(self.header):
            raise ValueError(f'Row has {len(cells)} cells while the header has '
                             f'{len(self.header)} columns')
        self.rows.append(list(cells))
        return self

    def to_textblock(self) -> TextBlock:
        """Render the table into a TextBlock."""
        str_rows = [[str(cell) for cell in row] for row in self.rows]
        widths = [max([len(self.header[i])] + [len(row[i]) for row in str_rows])
                  for i in range(len(self.header))]

        def render(cells: List[str]) -> str:
            return '| ' + ' | '.join(c.ljust(w) for c, w in zip(cells, widths)) + ' |'

        tb = TextBlock(render(self.header))
        tb += '|' + '|'.join('-' * (w + 2) for w in widths) + '|'
        for row in str_rows:
            tb += render(row)
        return tb

    def __str__(self) -> str:
        return str(self.to_textblock())
