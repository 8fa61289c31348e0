from evasion.cli import main

main()
