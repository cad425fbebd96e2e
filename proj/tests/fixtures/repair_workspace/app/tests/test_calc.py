import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from calc import add, scale


def main():
    assert scale([1, 2], 3) == [3, 6]
    result = add(2, 3)
    assert result == 5, "add(2, 3) returned %r" % result
    print("all tests passed")


if __name__ == "__main__":
    main()
