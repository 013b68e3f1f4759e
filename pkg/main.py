"""blurmap - blur detection maps, focus points, blur magnification and evaluation.

    python main.py detect photo.jpg map.png
    python main.py eval suite/images suite/masks results/
"""

import sys

from blurmap.cli import main


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        sys.exit(130)
