"""
Test data for validating the generated output by the text_gen module.

Copyright (c) 2024 The linfsindy developers
This is free software, released under the MIT License. Refer to linfsindy/LICENSE.
"""

SIMPLE_TB = '''\
line 1
line 2

line 4
'''

SIMPLE_TB_DEFAULT_INDENT_SPACES = '''\
    line 1
    line 2

    line 4
'''

SIMPLE_TB_BULLETS = '''\
-   line 1
-   line 2

-   line 4
'''

MARKDOWN_TABLE = '''\
| cell    | RMSE     |
|---------|----------|
| sigma=0 | 0.2881   |
| sigma=1 | **9.01** |
'''
