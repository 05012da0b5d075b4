import sys

from corrclust.cli import main

sys.exit(main())
