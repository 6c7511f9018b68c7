PKG_NAME = "init_pkg"


def version():
    return PKG_NAME + " 1.0"
