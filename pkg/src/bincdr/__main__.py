import sys
from bincdr.cli import main
sys.exit(main())
