#!/usr/bin/python3

'''
python3 -m venv venv-bianchi-height
source venv-bianchi-height/bin/activate

pip install --upgrade pip
pip install pyinstaller pyinstaller-hooks-contrib
pip install -r requirements.txt
cd src

## windows / ubuntu ##
python3 -m PyInstaller --onefile --name bianchi_height --collect-all gmpy2 program_launcher.py

'''

import sys

from bianchi_height.prog_bianchi import main

if __name__ == "__main__":
    sys.exit(main())
