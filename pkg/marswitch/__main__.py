from marswitch.cli import marswitch

if __name__ == '__main__':
    marswitch()
