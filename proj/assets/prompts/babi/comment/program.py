    def story(self):
        ## Mary moved to the bathroom.
        self.Mary.location = "bathroom"
        ## Sandra journeyed to the bedroom.
        self.Sandra.location = "bedroom"
        ## Mary got the football there.
        self.Mary.inventory.append("football")
        self.football.carrier = "Mary"
        self.football.location = "bathroom"
        ## John went to the kitchen.
        self.John.location = "kitchen"
        ## Mary went back to the kitchen.
        self.Mary.location = "kitchen"
        self.football.location = "kitchen"
        ## Mary dropped the football.
        self.football.carrier = None
        self.football.location = "kitchen"
        ## Mary journeyed to the garden.
        self.Mary.location = "garden"
        ## Question: Where is the football?
        print(self.football.location)
