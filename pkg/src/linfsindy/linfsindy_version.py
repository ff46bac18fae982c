"""
linfsindy - centralized version and copyright constants
"""

COPYRIGHT = '''\
Copyright (c) 2024 The linfsindy developers
This is free software, released under the MIT License. Refer to linfsindy/LICENSE.
'''

VERSION = '1.0.DEV'
