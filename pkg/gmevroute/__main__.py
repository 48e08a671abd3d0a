#
# This file is part of gmevroute which is released under the BSD 3-clause
# license. See accompanying LICENSE.md for copyright notice and full license
# details.
#

import sys

from ._cli import main

sys.exit(main())
