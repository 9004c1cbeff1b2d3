from igmc.cli import main

main()
