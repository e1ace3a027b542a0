    def story(self):
        ## Mary moved to the bathroom.
        go(character=Mary, destination=bathroom)
        ## Sandra journeyed to the bedroom.
        go(character=Sandra, destination=bedroom)
        ## Mary got the football there.
        grab(character=Mary, object=football)
        ## John went to the kitchen.
        go(character=John, destination=kitchen)
        ## Mary went back to the kitchen.
        go(character=Mary, destination=kitchen)
        ## Mary dropped the football.
        drop(character=Mary, object=football)
        ## Mary journeyed to the garden.
        go(character=Mary, destination=garden)
        ## Question: Where is the football?
        print(self.football.location)
