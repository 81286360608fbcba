import sys

from lettuce_climate_optimizer.cli import main

sys.exit(main())
