import sys

from py_capq.cli import main

if __name__ == '__main__':
    sys.exit(main())
