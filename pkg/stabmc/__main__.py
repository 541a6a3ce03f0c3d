from stabmc.main import main

main()
