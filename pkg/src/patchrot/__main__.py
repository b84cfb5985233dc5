import sys

from patchrot.harness.cli import main

sys.exit(main())
