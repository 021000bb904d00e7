from __future__ import absolute_import

import sys

from salientcodec.cli import main

sys.exit(main())
